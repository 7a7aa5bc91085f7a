import sys

from avnlab.cli import main

sys.exit(main())
