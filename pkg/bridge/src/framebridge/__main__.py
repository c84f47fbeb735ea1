import sys

from framebridge.cli import main

sys.exit(main())
