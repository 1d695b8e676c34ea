"""Beatlength: beat-wavelength modelling for electrons crossing a laser-lit dielectric film."""
