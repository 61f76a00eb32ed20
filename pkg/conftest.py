# octowinding.settings switches to test mode when "test" is in sys.argv (as
# under `manage.py test`). Reproduce that for pytest before settings load.
import os
import sys

if "test" not in sys.argv:
    sys.argv.append("test")

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "octowinding.settings")

import django  # noqa: E402

django.setup()
