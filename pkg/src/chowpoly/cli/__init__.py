"""Text grammar, relation registry and the command line front end."""
