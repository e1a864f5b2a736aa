from setuptools import setup


setup(
    name="socvexify",
    version="0.1",
    packages=["socvexify"],
    install_requires=["numpy", "scipy", "pandas"],
    entry_points={"console_scripts": ["socvexify = socvexify._cli:main"]},
    zip_safe=False,
)
