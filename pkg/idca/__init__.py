from idca.__version__ import __version__
