# Generated by Django 5.2.6 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('experiment', 'Experiment'), ('validation', 'Validation')], max_length=20)),
                ('seed', models.DecimalField(decimal_places=0, max_digits=20)),
                ('config', models.JSONField()),
                ('report', models.JSONField()),
                ('output_dir', models.CharField(max_length=500)),
                ('passed', models.BooleanField(null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
