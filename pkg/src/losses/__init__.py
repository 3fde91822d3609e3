"""Training objectives"""
from .logits import LogitSet
from .adversarial import hinge_d_loss, hinge_g_loss, discriminator_consistency
from .faketwins import faketwins_loss, faketwins_on_views, encode_views
from .totals import LossWeights, DLossParts, GLossParts, total_d_loss, total_g_loss

__all__ = [
    'LogitSet', 'hinge_d_loss', 'hinge_g_loss', 'discriminator_consistency',
    'faketwins_loss', 'faketwins_on_views', 'encode_views',
    'LossWeights', 'DLossParts', 'GLossParts', 'total_d_loss', 'total_g_loss',
]
