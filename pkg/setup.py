from setuptools import setup, find_packages

with open("./README.md", "r") as f:
    long_description = f.read()

setup(
    name="linopen",
    version="0.1.0",
    description="Local stabilizability analysis of nonlinear control systems through linear openness.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT",
    keywords="control stabilization feedback openness",
    python_requires=">=3.7",
    packages=find_packages(exclude=["docs", "experiments", "test"]),
    package_data={"docs": ["README.md"], "linopen": ["schemas/*.json"]},
    install_requires=["ebbe>=1.9.0,<2", "numpy>=1.17", "scipy>=1.7"],
    extras_require={
        "pandas": ["pandas"],
    },
    entry_points={"console_scripts": ["linopen=linopen.cli:main"]},
    zip_safe=False,
)
