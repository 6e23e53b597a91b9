"""Unsupervised visual feature learning with spiking networks and sparse auto-encoders.

Thin Python layer over the C++ core: image coding (DoG on/off channels,
latency coding), a single-layer integrate-and-fire network trained with
multiplicative STDP under winner-take-all inhibition and threshold
homeostasis, a sparse auto-encoder trained with Adadelta, sum-pooled image
descriptors with a linear classifier, and feature-quality metrics.
"""

from snnae._core import (
    LinearModel,
    Snn,
    SparseAutoencoder,
    coherence,
    decode_features,
    dog_filter,
    encode_image,
    encode_latency,
    gaussian_kernel,
    load_cifar10,
    make_synthetic,
    sparseness,
    sum_pool,
    to_grayscale,
    train_linear,
)

__all__ = [
    "LinearModel",
    "Snn",
    "SparseAutoencoder",
    "coherence",
    "decode_features",
    "dog_filter",
    "encode_image",
    "encode_latency",
    "gaussian_kernel",
    "load_cifar10",
    "make_synthetic",
    "sparseness",
    "sum_pool",
    "to_grayscale",
    "train_linear",
]

__version__ = "0.1.0"
