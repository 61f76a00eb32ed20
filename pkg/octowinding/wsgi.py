"""
WSGI config for the octowinding run ledger (admin only).

It exposes the WSGI callable as a module-level variable named ``application``.
"""

import os

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "octowinding.settings")


from django.core.wsgi import get_wsgi_application  # noqa
application = get_wsgi_application()
