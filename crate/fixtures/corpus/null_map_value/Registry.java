package demo;

import java.util.HashMap;
import java.util.Map;

public class Registry {
    private final Map<String, String> names = new HashMap<>();

    public Registry() {
        names.put("a", "alpha");
    }

    public int showBug(String key) {
        String value = names.get(key);
        int length = value.length();
        return length;
    }
}
