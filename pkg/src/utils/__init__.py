"""Utilities package"""
from .logger import get_logger, Logger
from .seeding import seed_everything, seeded

__all__ = ['get_logger', 'Logger', 'seed_everything', 'seeded']
