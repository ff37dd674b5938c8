from setuptools import setup


setup(
    name="spin-origami",
    version="0.1.0",
    description="Spin structures on square-tiled surfaces and their framed twist relations",
    license="Public Domain",
    packages=[
        "spinorigami",
    ],
    package_data={
        "spinorigami": ["templates/*.json"],
    },
    install_requires=[
        req for req in open("requirements.txt").read().split("\n") if len(req) > 0
    ],
    python_requires=">3.8",
    entry_points={
        "console_scripts": [
            "spinorigami = spinorigami.__main__:cli",
        ],
    },
)
