import sys

from socvexify._cli import main

sys.exit(main())
