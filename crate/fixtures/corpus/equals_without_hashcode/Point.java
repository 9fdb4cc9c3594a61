package demo;

import java.util.HashSet;
import java.util.Set;

public class Point {
    private final int x;
    private final int y;

    public Point(int x, int y) {
        this.x = x;
        this.y = y;
    }

    @Override
    public boolean equals(Object o) {
        if (!(o instanceof Point)) {
            return false;
        }
        Point p = (Point) o;
        return p.x == x && p.y == y;
    }

    public boolean showBug() {
        Set<Point> set = new HashSet<>();
        set.add(new Point(1, 2));
        return set.contains(new Point(1, 2));
    }
}
