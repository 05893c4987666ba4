const lengths = ["aa", "b"].map((s) => s.length);
