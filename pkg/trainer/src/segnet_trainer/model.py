"""Depth-3 U-Net for dense heatmap regression on rho x theta images.

Input heights need not be multiples of 4: the forward pass zero-pads to
the next multiple and crops the output back, so the 101-row default grid
works unchanged.  Channel widths grow with depth so most of the capacity
sits at low resolution, which keeps single-core CPU training tractable.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class ConvBlock(nn.Module):
    def __init__(self, c_in: int, c_out: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Conv2d(c_in, c_out, 3, padding=1),
            nn.BatchNorm2d(c_out),
            nn.ReLU(inplace=True),
            nn.Conv2d(c_out, c_out, 3, padding=1),
            nn.BatchNorm2d(c_out),
            nn.ReLU(inplace=True),
        )

    def forward(self, x):
        return self.net(x)


class UNet(nn.Module):
    """Two pooling stages -> factor-4 padding requirement, handled internally."""

    def __init__(self, in_channels: int = 1, widths: tuple[int, int, int] = (8, 32, 192)):
        super().__init__()
        c1, c2, c3 = widths
        self.enc1 = ConvBlock(in_channels, c1)
        self.enc2 = ConvBlock(c1, c2)
        self.enc3 = ConvBlock(c2, c3)
        self.pool = nn.MaxPool2d(2)
        self.up2 = nn.ConvTranspose2d(c3, c2, 2, stride=2)
        self.dec2 = ConvBlock(2 * c2, c2)
        self.up1 = nn.ConvTranspose2d(c2, c1, 2, stride=2)
        self.dec1 = ConvBlock(2 * c1, c1)
        self.head = nn.Conv2d(c1, 1, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h, w = x.shape[-2:]
        pad_h = (-h) % 4
        pad_w = (-w) % 4
        if pad_h or pad_w:
            x = F.pad(x, (0, pad_w, 0, pad_h))
        a = self.enc1(x)
        b = self.enc2(self.pool(a))
        c = self.enc3(self.pool(b))
        y = self.dec2(torch.cat([self.up2(c), b], dim=1))
        y = self.dec1(torch.cat([self.up1(y), a], dim=1))
        y = self.head(y)
        return y[..., :h, :w]

    def n_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())
