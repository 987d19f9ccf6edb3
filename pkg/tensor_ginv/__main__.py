import sys

from tensor_ginv.cli import main

sys.exit(main())
