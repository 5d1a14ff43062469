# Image decoding, perturbation and augmentation
from daf_forensics.imaging.augment import AugmentSpec, augment
from daf_forensics.imaging.degrade import PerturbSpec, perturb
from daf_forensics.imaging.loader import GrayImage, load_image, save_image

__all__ = ["AugmentSpec", "GrayImage", "PerturbSpec", "augment", "load_image", "perturb", "save_image"]
