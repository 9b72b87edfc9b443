from setuptools import setup, find_packages

setup(
    name='hybrid_kinematics',
    version='0.1.0',
    description='Action-conditional changepoint detection of articulation models and hybrid automaton export',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    py_modules=['logger'],
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.14',
        'networkx>=3.0',
        'pydantic>=2.0',
        'python-dotenv>=0.19.0',
        'rich>=13.0',
    ],
    entry_points={
        'console_scripts': ['hkin=cli:main'],
    },
)
