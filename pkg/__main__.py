#!/usr/bin/env python3
# -*- coding: utf-8 -*-
import sys
from g2e import main

if __name__ == "__main__":
    main(sys.argv[1:])
