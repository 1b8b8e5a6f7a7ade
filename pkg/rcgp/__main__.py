import sys

from rcgp.main import main

sys.exit(main())
