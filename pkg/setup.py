import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

with open("VERSION", "r") as f:
    version = f.read().strip()

with open("requirements.txt", "r") as f:
    install_requires = f.readlines()

with open("requirements-test.txt", "r") as f:
    tests_require = f.readlines()

setuptools.setup(
    name="cutfsci",
    version=version,
    description="Unfitted finite element solver for fluid-structure-contact interaction in 2D.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["test.*", "test"]),
    include_package_data=True,
    package_data={
        'cutfsci': ['config/*.ini', 'scenarios/*.ini'],
    },
    install_requires=install_requires,
    extras_require={"test": tests_require},
    entry_points={
        'console_scripts': [
            'cutfsci=cutfsci.api.cli:cli'
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ]
)
