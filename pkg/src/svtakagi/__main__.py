import sys

from svtakagi.cli import main

sys.exit(main())
