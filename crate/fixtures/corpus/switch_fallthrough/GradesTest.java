package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class GradesTest {
    @Test
    public void ninetyFiveIsAnA() {
        assertEquals("A", new Grades().showBug(95));
    }
}
