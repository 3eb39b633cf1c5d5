# End-to-end tests of the renewal-lab command line
