"""Classical protocols: grid epsilon-net, shared-codebook protocol, query samplers"""
