"""TD-DBP toolkit.

Time-domain digital backpropagation for fiber-optic receivers: forward
channel simulation, CD filter design, a float and bit-exact fixed-point DBP
datapath, joint learning of the filter taps with pruning and fake
quantization, and launch-power sweep experiments.
"""

__version__ = "0.1.0"
