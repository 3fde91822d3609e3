"""HP-GAN - Desk-scale projected GAN training harness"""
__version__ = "1.0.0"
