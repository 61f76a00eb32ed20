from django.contrib.admin import ModelAdmin, register

from . import models


@register(models.ExperimentRun)
class ExperimentRunAdmin(ModelAdmin):
    list_display = ('id', 'command', 'space', 'status', 'n_paths', 'short_hash', 'created_at', 'duration')
    list_filter = ('command', 'space', 'status')
    search_fields = ('config_hash', 'summary', 'error')
    readonly_fields = [f.name for f in models.ExperimentRun._meta.fields]

    def short_hash(self, obj):
        return obj.config_hash[:12]
    short_hash.short_description = "Config hash"

    def has_add_permission(self, request):
        return False
