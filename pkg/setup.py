from setuptools import find_packages, setup

setup(
    name="ris_uwoc_perf",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "joblib",
        "progressbar2",
    ],
    extras_require={"tracking": ["mlflow"], "test": ["pytest"]},
    entry_points={"console_scripts": ["ris-uwoc = ris_uwoc_perf.cli:main"]},
    python_requires=">=3.8",
    description="Outage, bit-error-rate and capacity analysis of RIS-assisted "
    "RF-underwater optical relay links",
)
