"""Spectral normalization with a persisted power-iteration vector"""
from typing import Tuple

import torch
import torch.nn.functional as F
from torch import nn

SIGMA_EPS = 1e-12


def spectral_normalize(weight: torch.Tensor, u: torch.Tensor, update: bool = True,
                       eps: float = SIGMA_EPS) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    Divide a weight by its top singular value estimated with one power step.

    The weight is viewed as a (out, -1) matrix. ``u`` is the persisted
    left singular-vector estimate; it is refreshed in place when ``update``
    is set, so repeated calls converge to the true singular value.

    Args:
        weight: Weight of any shape, first dim is the output dim
        u: Left singular-vector estimate, shape (out,)
        update: Write the refreshed estimate back into ``u``
        eps: Guard on the singular value; a zero matrix is returned unchanged

    Returns:
        (normalized weight, estimated singular value)
    """
    w_mat = weight.reshape(weight.shape[0], -1)
    with torch.no_grad():
        v = F.normalize(torch.mv(w_mat.t(), u.to(w_mat)), dim=0, eps=eps)
        u_new = F.normalize(torch.mv(w_mat, v), dim=0, eps=eps)
        if update:
            u.copy_(u_new.to(u))
    sigma = torch.dot(u_new, torch.mv(w_mat, v))
    if sigma.abs().item() <= eps:
        return weight, sigma
    return weight / sigma, sigma


class SNConv2d(nn.Conv2d):
    """Conv2d whose weight is spectrally normalized on every forward"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.register_buffer("sn_u", F.normalize(torch.randn(self.out_channels), dim=0))
        if self.bias is not None:
            nn.init.zeros_(self.bias)

    def normalized_weight(self) -> torch.Tensor:
        weight, _ = spectral_normalize(self.weight, self.sn_u, update=self.training)
        return weight

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self._conv_forward(x, self.normalized_weight(), self.bias)
