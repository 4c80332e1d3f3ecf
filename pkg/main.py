"""
Run the wavcyclegan command line from a source checkout
"""
from app.main import main

if __name__ == "__main__":
    main()
