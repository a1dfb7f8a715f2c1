"""membooth: a streaming-transcription sandbox with live word/phrase memory.

A scripted recognizer plays talks as timed "audio" over a jittery packet
link; a worker decodes chunks, biases hypotheses toward a runtime-mutable
memory of new words, and emits stable text that an operator (scripted or
human, via the wire protocol) can keep correcting mid-talk.
"""

from membooth._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
