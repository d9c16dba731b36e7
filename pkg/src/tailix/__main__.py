import sys

from tailix.cli import main

sys.exit(main())
