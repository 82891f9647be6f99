namespace fdc {}
