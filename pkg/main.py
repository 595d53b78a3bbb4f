# -*- coding: utf-8 -*-
from utils.client import StateVolPool

pool = StateVolPool()

raise SystemExit(pool.setup())
