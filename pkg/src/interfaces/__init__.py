"""Abstract interfaces for HP-GAN components"""
from .feature_network import FeatureNetwork
from .ssl_objective import SslObjective
from .output_generator import OutputGenerator

__all__ = ['FeatureNetwork', 'SslObjective', 'OutputGenerator']
