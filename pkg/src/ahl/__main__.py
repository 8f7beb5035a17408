import sys

from ahl.cli import main

sys.exit(main())
