"""Config, command table, runner and CLI for the experiments"""
