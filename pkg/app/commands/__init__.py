"""Commands module - one CLI subcommand per module"""
from app.commands import baseline, denoise, evaluate, synth, train, wavelet

COMMANDS = (synth, train, denoise, evaluate, wavelet, baseline)

__all__ = ["COMMANDS"]
