import sys

from edgematch.cli import main

sys.exit(main())
