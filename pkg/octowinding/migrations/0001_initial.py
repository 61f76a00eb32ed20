from django.db import migrations, models
import django.utils.timezone


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('simulate', 'simulate'), ('charfn', 'charfn'),
                                                      ('verify', 'verify'), ('table', 'table')], max_length=16)),
                ('space', models.CharField(blank=True, max_length=16)),
                ('seed', models.CharField(max_length=20)),
                ('n_paths', models.PositiveIntegerField(default=0)),
                ('config_hash', models.CharField(db_index=True, max_length=64)),
                ('config', models.JSONField(default=dict)),
                ('status', models.CharField(choices=[('running', 'running'), ('succeeded', 'succeeded'),
                                                     ('failed', 'failed')], default='running', max_length=16)),
                ('summary', models.TextField(blank=True)),
                ('error', models.TextField(blank=True)),
                ('artifacts', models.JSONField(blank=True, default=list)),
                ('created_at', models.DateTimeField(db_index=True, default=django.utils.timezone.now)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
