import sys

from waveop.cli import main

sys.exit(main())
