"""Augmentations, blur schedule and latent perturbation"""
from .rng import RngStream
from .diff_augment import AugmentPolicy, diff_augment, translate, cutout, adjust_brightness
from .blur import gaussian_blur, gaussian_kernel1d, blur_sigma
from .latent import latent_perturb, xflip_amplify

__all__ = [
    'RngStream', 'AugmentPolicy', 'diff_augment', 'translate', 'cutout', 'adjust_brightness',
    'gaussian_blur', 'gaussian_kernel1d', 'blur_sigma', 'latent_perturb', 'xflip_amplify',
]
