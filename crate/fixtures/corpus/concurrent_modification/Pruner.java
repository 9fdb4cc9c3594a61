package demo;

import java.util.ArrayList;
import java.util.List;

public class Pruner {
    public int showBug(int n) {
        List<Integer> values = new ArrayList<>();
        for (int i = 0; i < n; i++) {
            values.add(i);
        }
        for (Integer v : values) {
            if (v % 2 == 0) {
                values.remove(v);
            }
        }
        return values.size();
    }
}
