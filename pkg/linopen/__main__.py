import sys

from linopen.cli import main

sys.exit(main())
