"""Tests for rubi."""
