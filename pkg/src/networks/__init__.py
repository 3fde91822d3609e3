"""Trainable networks"""
from .spectral import spectral_normalize, SNConv2d
from .generator import Generator
from .discriminator import DiscriminatorBank, ImageDiscriminator, LevelDiscriminator
from .head import LinearHead
from .ema import EmaState, ema_update

__all__ = [
    'spectral_normalize', 'SNConv2d', 'Generator', 'DiscriminatorBank', 'ImageDiscriminator',
    'LevelDiscriminator', 'LinearHead', 'EmaState', 'ema_update',
]
