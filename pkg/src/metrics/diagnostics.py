"""Overfitting heuristic on discriminator outputs"""
import torch


def signed_logit_fraction(real_scalar_logits: torch.Tensor) -> float:
    """Share of per-sample summed real logits that are strictly positive"""
    logits = torch.as_tensor(real_scalar_logits).reshape(-1)
    if logits.numel() == 0:
        return 0.0
    return float((logits > 0).to(torch.float64).mean())
