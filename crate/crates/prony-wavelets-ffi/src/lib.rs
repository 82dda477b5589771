// placeholder until the C ABI is written
