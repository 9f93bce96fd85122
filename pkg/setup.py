from setuptools import find_packages, setup

setup(
    name='DHCPSimulation',
    version='0.1dev',
    description='Hierarchical cycle planning for traffic signals, with a '
                'built-in microsimulator and classical baselines',
    packages=find_packages(include=['dhcpsimulation', 'dhcpsimulation.*']),
    package_data={'dhcpsimulation': ['settings/*.yaml',
                                     'settings/scenarios/*/*.json']},
    install_requires=['numpy', 'pint', 'PyYAML'],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': [
        'dhcpsimulation=dhcpsimulation.main:main']},
    license='MIT License',
    long_description=open('README.MD').read(),
)
