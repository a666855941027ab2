import sys

from adelic_zeta.cli import main

sys.exit(main())
