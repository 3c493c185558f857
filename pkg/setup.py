import setuptools

import entrolab

version = entrolab.version.rsplit(' ', maxsplit=1)[-1]

with open('requirements.txt', 'r') as f:
    requirements = f.read().splitlines()

setuptools.setup(
    name='entrolab',
    version=version,
    scripts=['entrolab_cli'],
    python_requires='>=3.8',
    install_requires=requirements,
    extras_require={
        'uvloop': ['uvloop>=0.14'],
    },
    packages=setuptools.find_packages(include=('entrolab*',)),
    description='Multipartite squashed entanglement bounds',
    author='the entrolab developers',
    license='MIT Licence',
    long_description='Upper bounds on multipartite squashed entanglement, '
    'entropic identities and classical secrecy monotones',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: AsyncIO',
        'License :: OSI Approved :: MIT License',
        'Operating System :: Unix',
        "Programming Language :: Python :: 3.8",
        'Topic :: Scientific/Engineering :: Physics',
    ],
)
