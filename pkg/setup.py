import setuptools


if __name__ == '__main__':
    with open('README.md', 'r') as fh:
        long_description = fh.read()

    setuptools.setup(
        name='polylin-python',
        version='0.1.0',
        packages=setuptools.find_packages(exclude=['tests']),
        install_requires=['numpy', 'scipy', 'matplotlib'],
        extras_require={'test': ['pytest', 'hypothesis']},
        entry_points={'console_scripts': ['polylin=polylin.cli:main']},
        description='Block-symmetric linearizations of matrix polynomials, with conditioning and backward-error diagnostics.',
        keywords=['matrix polynomial', 'linearization', 'eigenvalue', 'pencil', 'condition number', 'backward error'],
        long_description=long_description,
        long_description_content_type='text/markdown',
        classifiers=[
            'Programming Language :: Python :: 3',
            'License :: OSI Approved :: MIT License',
            'Operating System :: OS Independent',
            'Topic :: Scientific/Engineering :: Mathematics',
        ],
        python_requires='>=3.9',
    )

    # python setup.py sdist bdist_wheel
    # twine upload dist/*
