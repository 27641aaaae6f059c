"""
dauto - domain adaptation with autoencoder-regularized adversarial networks
"""

__version__ = "0.1.0"
__logo__ = "🧪"
