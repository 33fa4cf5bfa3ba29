"""RUBI - ranked unsupervised bilingual lexicon induction."""

__version__ = "0.1.0"
__author__ = "Bitfuturistic Solutions"
