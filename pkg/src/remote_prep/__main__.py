import sys

from remote_prep.cli import main

sys.exit(main())
